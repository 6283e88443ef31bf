#include <cstdio>
int main() { std::puts("freeconv"); return 0; }
