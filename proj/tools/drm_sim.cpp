#include "drm/cli.hpp"

int main(int argc, char** argv)
{
    return drm::cli_main(argc, argv);
}
