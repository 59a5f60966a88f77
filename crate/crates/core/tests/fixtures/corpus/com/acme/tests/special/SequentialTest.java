package com.acme.tests.special;

import com.acme.common.Params;
import com.acme.common.Result;
import com.acme.helpers.HelperClass;
import com.acme.radio.CellManager;
import com.acme.testing.ComponentTest;
import com.acme.trace.TraceStore;

import static com.acme.helpers.Asserts.assertTrue;

public class SequentialTest extends ComponentTest {
    private final CellManager cells = new CellManager();
    private final TraceStore store = new TraceStore();

    public void testEnableThenDisable() {
        String id = Params.getContent();
        TestBegin("Enable power on the first cell");
        assertTrue("enable", cells.enablePower(id).isSuccessful());
        TestEnd();
        store.clear();
        TestBegin("Disable power on the first cell");
        assertTrue("disable", cells.disablePower(id).isSuccessful());
        assertTrue("gone", !cells.isPowerEnabled(id));
        TestEnd();
    }

    public void testSingle() {
        TestBegin("Read the trace after a power cycle"); String data = HelperClass.getInstance().getData(); TestEnd();
    }
}
