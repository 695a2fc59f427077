#include "coupled/cli.hpp"

int main(int argc, char **argv)
{
   return coupled::run_cli(argc, argv);
}
