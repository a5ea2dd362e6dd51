#![allow(dead_code)]

use fsbench::rng::SplitMix64;
use fsbench::{DataTable, MissingPolicy};

pub fn table(header: &[&str], rows: &[&[&str]]) -> DataTable {
    let records: Vec<Vec<&str>> = rows.iter().map(|r| r.to_vec()).collect();
    DataTable::from_records(header, "class", &records, MissingPolicy::AsCategory).unwrap()
}

pub fn single(a: [&str; 4], class: [&str; 4]) -> DataTable {
    let rows: Vec<[&str; 2]> = (0..4).map(|i| [a[i], class[i]]).collect();
    let refs: Vec<&[&str]> = rows.iter().map(|r| &r[..]).collect();
    table(&["A", "class"], &refs)
}

pub fn d_perfect() -> DataTable {
    single(["1", "1", "2", "2"], ["M", "M", "F", "F"])
}

pub fn d_indep() -> DataTable {
    single(["1", "1", "2", "2"], ["M", "F", "M", "F"])
}

pub fn d_skew() -> DataTable {
    single(["1", "1", "1", "2"], ["M", "M", "F", "F"])
}

pub const D_PERFECT_CSV: &str = "A,gender\n1,M\n1,M\n2,F\n2,F\n";

/// Small random table: 2..=200 rows, 1..=6 attributes with 1..=5 categories,
/// 2..=3 classes, and sometimes empty fields (read as an `NA` category).
pub fn random_table(seed: u64) -> DataTable {
    let mut rng = SplitMix64::new(seed);
    let n_classes = 2 + rng.below(2);
    let n_rows = n_classes + rng.below(200 - n_classes + 1);
    let n_attr = 1 + rng.below(6);
    let cats: Vec<usize> = (0..n_attr).map(|_| 1 + rng.below(5)).collect();
    let missing: Vec<f64> = (0..n_attr)
        .map(|_| if rng.below(4) == 0 { 0.2 } else { 0.0 })
        .collect();
    let mut header: Vec<String> = (0..n_attr).map(|a| format!("a{a}")).collect();
    header.push("class".into());
    let records: Vec<Vec<String>> = (0..n_rows)
        .map(|r| {
            let mut rec: Vec<String> = (0..n_attr)
                .map(|a| {
                    if rng.next_f64() < missing[a] {
                        String::new()
                    } else {
                        (1 + rng.below(cats[a])).to_string()
                    }
                })
                .collect();
            let class = if r < n_classes { r } else { rng.below(n_classes) };
            rec.push(format!("c{class}"));
            rec
        })
        .collect();
    DataTable::from_records(&header, "class", &records, MissingPolicy::AsCategory).unwrap()
}
