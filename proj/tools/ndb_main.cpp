#include <iostream>
int main() { std::cout << "ndb placeholder\n"; return 0; }
