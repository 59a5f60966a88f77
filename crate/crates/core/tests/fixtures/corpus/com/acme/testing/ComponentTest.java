package com.acme.testing;

/** Base class providing the step framing calls. */
public abstract class ComponentTest {
    protected void TestBegin(String description) {
        System.out.println("BEGIN " + description);
    }

    protected void TestEnd() {
        System.out.println("END");
    }
}
