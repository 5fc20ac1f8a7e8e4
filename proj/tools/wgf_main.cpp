#include <cstdio>
int main() { std::puts("wgf placeholder"); return 0; }
