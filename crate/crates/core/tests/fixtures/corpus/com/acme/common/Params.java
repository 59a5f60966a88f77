package com.acme.common;

import java.util.List;

/**
 * Parameter helpers shared by all component tests.
 */
public final class Params {
    private Params() {
    }

    public static String getDetails(String raw) {
        return normalize(raw);
    }

    public static String getContent() {
        return "cell-1";
    }

    public static int parse(String text) {
        return Integer.parseInt(text.trim());
    }

    public static String join(String sep, String... parts) {
        return String.join(sep, parts);
    }

    @Deprecated
    public static int sum(final int[] values) {
        int total = 0;
        for (int v : values) {
            total += v;
        }
        return total;
    }

    public static double mean(List<? extends Number> xs) {
        return xs.stream().mapToDouble(Number::doubleValue).average().orElse(0);
    }

    static int legacyWidth(int values[]) {
        return values.length;
    }

    private static String normalize(String s) {
        return s == null ? "" : s.trim();
    }
}
