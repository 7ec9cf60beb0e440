#include <stdio.h>

int b[8388608];
int h[256];

void init(int n) {
    int i;
    long seed;
    seed = 12345;
    for (i = 0; i < n; i++) {
        seed = (seed * 1103515245 + 12345) % 2147483648;
        b[i] = (seed / 65536) % 256;
    }
}

void histogram(int n) {
    int i;
    for (i = 0; i < n; i++)
        h[b[i]]++;
}

int main() {
    int i;
    init(8388608);
    histogram(8388608);
    for (i = 0; i < 256; i++)
        printf("%d\n", h[i]);
    return 0;
}
