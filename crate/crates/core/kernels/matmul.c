#include <stdio.h>

double A[512][512];
double B[512][512];
double C[512][512];

void init(int n) {
    int i;
    int j;
    for (i = 0; i < n; i++) {
        for (j = 0; j < n; j++) {
            A[i][j] = (i * 7 + j * 3) % 17 * 0.125;
            B[i][j] = (i * 5 + j * 11) % 13 * 0.25;
        }
    }
}

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

double checksum(int n) {
    int i;
    int j;
    double s;
    s = 0.0;
    for (i = 0; i < n; i++) {
        for (j = 0; j < n; j++)
            s += C[i][j] * ((i + j) % 7 + 1);
    }
    return s;
}

int main() {
    init(512);
    matmul(512);
    printf("%.12e\n", checksum(512));
    return 0;
}
