"""Feature modules: verification suites and subcommand handlers."""
