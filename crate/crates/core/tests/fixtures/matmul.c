double A[128][128];
double B[128][128];
double C[128][128];

void matmul(int n) {
    int i;
    int j;
    int k;
    double sum;
    for (i = 0; i < n; i++) {
        for (j = 0; j < n; j++) {
            sum = 0.0;
            for (k = 0; k < n; k++)
                sum += A[i][k] * B[k][j];
            C[i][j] = sum;
        }
    }
}
