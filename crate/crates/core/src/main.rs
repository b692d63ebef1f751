fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("XCT_LOG_LEVEL", "warn")).init();
    std::process::exit(xcache_trace::cli::run(std::env::args_os()));
}
