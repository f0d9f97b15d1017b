//! Byte-stable JSON output. Set `UPDATE_GOLDEN=1` to rewrite the committed files.

mod common;

use common::{golden_dir, run_case, GOLDEN_CASES};

#[test]
fn json_output_matches_golden_files() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for (name, args) in GOLDEN_CASES {
        let (code, out, err) = run_case(args);
        assert_eq!(code, 0, "{name}: {err}");
        let path = golden_dir().join(name);
        if update {
            std::fs::write(&path, &out).unwrap();
            continue;
        }
        let stored =
            std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(stored, out, "{name}");
    }
}

#[test]
fn output_is_stable_across_runs() {
    for (name, args) in GOLDEN_CASES {
        assert_eq!(run_case(args), run_case(args), "{name}");
    }
}
