#include "medeq/cli.hpp"

int main(int argc, char** argv) { return medeq::cli::parse_and_dispatch(argc, argv); }
