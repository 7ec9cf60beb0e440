#include <stdio.h>

double u[4194304];
double v[4194304];

void init(int n) {
    int i;
    for (i = 0; i < n; i++) {
        u[i] = (i % 100) * 0.01;
        v[i] = u[i];
    }
}

void sweep(int n) {
    int i;
    for (i = 1; i < n - 1; i++)
        v[i] = (u[i - 1] + u[i] + u[i + 1]) / 3.0;
}

void copy_back(int n) {
    int i;
    for (i = 1; i < n - 1; i++)
        u[i] = v[i];
}

double checksum(int n) {
    int i;
    double s;
    s = 0.0;
    for (i = 0; i < n; i++)
        s += u[i] * (i % 3 + 1);
    return s;
}

int main() {
    int t;
    init(4194304);
    for (t = 0; t < 50; t++) {
        sweep(4194304);
        copy_back(4194304);
    }
    printf("%.12e\n", checksum(4194304));
    return 0;
}
