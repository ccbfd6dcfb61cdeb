#pragma once

#include <iosfwd>

namespace cvsim {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitAnomaly = 2, kExitIo = 3 };

/// Batch entry point. Flags:
///   --config <file>  --duration <s>  --flows W,S,E,N  --ratio <0..1>  --seed <u64>
///   --mode fast|medium|slow|very-slow|headless  --plan <file>  --out <dir>
///   --warmup <s>  --serve <port>  --ui <dir>
int parse_and_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cvsim
