void prefix_sum(int n, double a[], double x[]) {
    int i;
    a[0] = x[0];
    for (i = 1; i < n; i++)
        a[i] = a[i - 1] + x[i];
}
