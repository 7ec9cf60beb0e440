void smooth(int n, double u[], double v[]) {
    int i;
    for (i = 1; i < n - 1; i++)
        v[i] = (u[i - 1] + u[i] + u[i + 1]) / 3.0;
}
