void vector_add(int n, double a[], double b[], double c[]) {
    int i;
    for (i = 0; i < n; i++)
        c[i] = a[i] + b[i];
}
