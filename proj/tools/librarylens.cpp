#include "librarylens/cli.hpp"

int main(int argc, char** argv) { return librarylens::run_cli(argc, argv); }
