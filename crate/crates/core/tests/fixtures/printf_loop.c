#include <stdio.h>

void dump(int n, double a[]) {
    int i;
    for (i = 0; i < n; i++)
        printf("%d %f\n", i, a[i]);
}
