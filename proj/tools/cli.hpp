#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fkg::cli {

enum ExitCode : int {
    kOk = 0,
    kInvalid = 1,  // bad arguments or configuration
    kIo = 2,
    kBlowUp = 3,
};

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main_entry(int argc, char** argv);

}  // namespace fkg::cli
