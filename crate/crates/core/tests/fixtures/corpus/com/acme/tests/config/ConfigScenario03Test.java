package com.acme.tests.config;

import com.acme.common.*;
import com.acme.helpers.HelperClass;
import com.acme.helpers.Waits;
import com.acme.radio.*;
import com.acme.testing.ComponentTest;
import com.acme.trace.TraceStore;
import java.util.List;
import java.util.Map;

import static com.acme.helpers.Asserts.assertEquals;
import static com.acme.helpers.Asserts.assertTrue;
import static com.acme.helpers.Asserts.fail;

/** Config scenarios, set 3. */
public class ConfigScenario03Test extends ComponentTest {
    private final CellManager cells = new CellManager();
    private final LineController lines = LineController.getInstance();
    private final TraceStore store = new TraceStore();

    public void setUp() {
        store.clear();
    }

    public void testConfig0() {
        TestBegin("Check that trace buffer is stable");
        String id = Params.getDetails(Params.getContent());
        assertEquals("Event count", 3, store.count(id));
        store.clear();
        HelperClass.Config cfg = new HelperClass.Config().withTimeout(30);
        int power = Params.parse("42");
        Waits.waitFor(() -> cells.isPowerEnabled(id), 5000);
        Result c = cells.configure(id, power);
        assertEquals("Timeout", 30, cfg.timeout());
        String summary = String.format("%s:%d", id, power);
        TestEnd();
    }

    public void testConfig1() {
        setUp();
        TestBegin("Check that line is updated");
        String id = Params.getDetails(Params.getContent());
        int total = Params.sum(new int[] {1, 2, 3});
        List<String> events = store.read(id);
        store.clear();
        cells.configure(id);
        TestEnd();
    }

    public void testConfig2() {
        TestBegin("Confirm that signal trace is updated");
        String id = Params.getDetails(Params.getContent());
        String joined = Params.join(",", id, "x");
        assertEquals("Line state", Status.ENABLED, lines.lineStatus(id));
        Waits.waitFor(() -> cells.isPowerEnabled(id), 5000);
        store.clear();
        assertTrue("Power is not enabled", cells.enablePower(id).isSuccessful());
        TestEnd();
        store.clear();
    }

    private void checkPreconditions(String id) {
        assertTrue("cell known", cells.listCells().contains(id));
    }
}
