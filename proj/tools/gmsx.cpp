#include <cstdio>

int main() {
  std::puts("gmsx: CLI under construction");
  return 0;
}
