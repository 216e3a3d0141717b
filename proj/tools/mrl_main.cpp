#include "mrl/commands.hpp"

int main(int argc, char** argv) { return mrl::dispatch(argc, argv); }
