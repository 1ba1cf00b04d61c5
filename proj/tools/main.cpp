// Placeholder while the library grows; the real CLI lands with the io layer.
int main() { return 0; }
