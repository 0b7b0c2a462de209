#include "rsbench_cli.hpp"

int main(int argc, char** argv) {
    return rsbench::cli::main_entry(argc, argv);
}
