// Placeholder main; the CLI is assembled after the library settles.
int main() { return 0; }
