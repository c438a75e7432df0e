#pragma once

// Batch front-end: parses flags, runs one command, writes CSV/JSON artifacts
// into the output directory. Returns the process exit code: 0 success,
// 2 verification failed (plateau absent / spread over budget), 1 error.
int run_cli(int argc, const char* const* argv);
