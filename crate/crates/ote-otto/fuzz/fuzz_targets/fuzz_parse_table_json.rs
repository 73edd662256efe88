#![no_main]

use libfuzzer_sys::fuzz_target;
use ote_otto::cli::ResultTable;

// JSON twin of the CSV round-trip target; see fuzz_parse_table_csv.rs.
fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    let Ok(t1) = ResultTable::from_json(&text) else {
        return;
    };
    let t2 = ResultTable::from_json(&t1.to_json()).expect("serialized table re-parses");
    assert_eq!(t1.columns, t2.columns);
    assert_eq!(t1.metadata, t2.metadata);
    assert_eq!(t1.rows.len(), t2.rows.len());
    for (a, b) in t1.rows.iter().zip(&t2.rows) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }
});
