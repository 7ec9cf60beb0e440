void shift_down(int n, double a[]) {
    int i;
    for (i = 1; i < n; i++)
        a[i] = a[i - 1];
}
