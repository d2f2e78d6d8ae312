package org.sample.util;

public final class ArrayUtils {
    private ArrayUtils() {}

    public static int indexOf(int[] values, int target) {
        for (int i = 0; i < values.length; i++) {
            if (values[i] == target) {
                return i;
            }
        }
        return -1;
    }

    public static boolean contains(int[] values, int target) {
        return indexOf(values, target) >= 0;
    }

    public static void swap(int[] values, int i, int j) {
        int tmp = values[i];
        values[i] = values[j];
        values[j] = tmp;
    }

    public static void reverse(int[] values) {
        for (int i = 0, j = values.length - 1; i < j; i++, j--) {
            swap(values, i, j);
        }
    }

    public static int[] copyOf(int[] values, int length) {
        int[] copy = new int[length];
        for (int i = 0; i < length && i < values.length; i++) {
            copy[i] = values[i];
        }
        return copy;
    }

    public static boolean isEmpty(int[] values) {
        return values == null || values.length == 0;
    }

    public static int max(int[] values) {
        int best = values[0];
        for (int v : values) {
            if (v > best) {
                best = v;
            }
        }
        return best;
    }

    public static boolean isSorted(int[] values) {
        for (int i = 1; i < values.length; i++) {
            if (values[i - 1] > values[i]) {
                return false;
            }
        }
        return true;
    }
}
