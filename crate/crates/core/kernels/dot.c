#include <stdio.h>

double x[16777216];
double y[16777216];

void init(int n) {
    int i;
    for (i = 0; i < n; i++) {
        x[i] = (i % 1000) * 0.001;
        y[i] = ((i * 7) % 1000) * 0.002;
    }
}

double dot(int n) {
    int i;
    double s;
    s = 0.0;
    for (i = 0; i < n; i++)
        s += x[i] * y[i];
    return s;
}

int main() {
    int r;
    double total;
    init(16777216);
    total = 0.0;
    for (r = 0; r < 10; r++)
        total += dot(16777216);
    printf("%.12e\n", total);
    return 0;
}
