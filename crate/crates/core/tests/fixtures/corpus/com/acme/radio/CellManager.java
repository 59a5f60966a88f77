package com.acme.radio;

import com.acme.common.Result;
import java.util.ArrayList;
import java.util.List;

/** Power and configuration control for radio cells. */
public class CellManager {
    private final List<String> cells = new ArrayList<>();

    public boolean isPowerEnabled(String cellId) {
        return cells.contains(cellId);
    }

    public Result enablePower(String cellId) {
        cells.add(cellId);
        audit("enable " + cellId);
        return Result.success();
    }

    public Result disablePower(String cellId) {
        cells.remove(cellId);
        return Result.success();
    }

    public List<String> listCells() {
        return new ArrayList<>(cells);
    }

    /** Apply the default configuration. */
    public Result configure(String cellId) {
        return configure(cellId, 10);
    }

    /** Apply a configuration with an explicit power level. */
    public Result configure(String cellId, int power) {
        return power > 0 ? Result.success() : new Result(false, "bad power");
    }

    protected void audit(String msg) {
        // kept for subclasses
    }
}
