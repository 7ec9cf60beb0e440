void transform(int n, double a[]) {
    int i;
    for (i = 0; i < n; i++)
        a[i] = refine(a[i], i);
}
