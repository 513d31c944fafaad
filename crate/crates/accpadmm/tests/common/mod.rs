#![allow(dead_code)]

use std::path::PathBuf;

use accpadmm::qps::{dump_problem, parse_qps, to_standard_form_with, ConvertOptions};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/maros")
}

/// Edge-case files and the conversion their golden dump was derived under.
pub const GOLDEN: [(&str, bool); 12] = [
    ("e_range_pos", false),
    ("e_range_neg", true),
    ("l_range", false),
    ("g_range", false),
    ("bounds_fx", false),
    ("bounds_mi_fr", false),
    ("up_negative", false),
    ("duplicates", false),
    ("objconst", false),
    ("reduce_fixed", true),
    ("reduce_singleton", true),
    ("reduce_empty", true),
];

/// `(dump produced now, golden dump)` for one edge-case file.
pub fn golden_pair(name: &str, reduced: bool) -> (String, String) {
    let dir = data_dir().join("qps");
    let text = std::fs::read_to_string(dir.join(format!("{name}.qps"))).unwrap();
    let golden = std::fs::read_to_string(dir.join(format!("{name}.dump"))).unwrap();
    let opts = if reduced { ConvertOptions::default() } else { ConvertOptions::plain() };
    let (p, _) = to_standard_form_with(&parse_qps(&text).unwrap(), opts).unwrap();
    (dump_problem(&p), golden)
}

/// Constraint and variable counts reported for the corpus after conversion.
pub const REFERENCE_SHAPES: [(&str, usize, usize); 25] = [
    ("AUG2D", 9604, 19404),
    ("AUG2DC", 10000, 20200),
    ("AUG3DQP", 972, 3133),
    ("CONT-101", 9801, 9900),
    ("CONT-201", 39601, 39800),
    ("CONT-300", 89401, 89700),
    ("GOULDQP3", 349, 699),
    ("HS118", 29, 44),
    ("KSIP", 1000, 1020),
    ("QRECIPE", 59, 116),
    ("QSCAGR25", 274, 473),
    ("QSCORPIO", 161, 226),
    ("QSCRS8", 192, 945),
    ("QSCSD1", 77, 760),
    ("QSCSD8", 397, 2750),
    ("QSCTAP2", 977, 2303),
    ("QSCTAP3", 1274, 3041),
    ("QSHIP04L", 288, 1901),
    ("QSHIP04S", 188, 1253),
    ("QSHIP08L", 478, 3137),
    ("QSHIP08S", 256, 1578),
    ("QSHIP12L", 637, 4226),
    ("QSHIP12S", 322, 1953),
    ("QSIERRA", 915, 2347),
    ("QSTANDAT", 192, 500),
];

pub mod gen;
pub mod props;
