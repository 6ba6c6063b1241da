#![no_main]

use higgs_ks::scenario::Scenario;
use higgs_ks::Error;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    if let Err(Error::Parse { line, column, .. }) = Scenario::from_toml("fuzz", src, None) {
        assert!(line >= 1 && column >= 1);
        assert!(line <= src.lines().count().max(1) + 1);
    }
});
