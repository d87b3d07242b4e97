#include <hfvdd/cli.hpp>

int main(int argc, char** argv) {
  return hfvdd::run_cli({argv + 1, argv + argc});
}
