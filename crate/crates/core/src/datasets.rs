//! Frequency tables shipped with the crate.

use crate::table::FrequencyTable;

#[derive(Debug, Clone, Copy)]
pub struct EmbeddedDataset {
    pub name: &'static str,
    /// Counts at the consecutive values `0, 1, 2, …`.
    pub counts: &'static [u64],
    pub provenance: &'static str,
}

impl EmbeddedDataset {
    pub fn table(&self) -> FrequencyTable {
        FrequencyTable::from_counts(self.counts).expect("embedded counts are valid")
    }
}

pub const WILLMOT: EmbeddedDataset = EmbeddedDataset {
    name: "willmot",
    counts: &[3719, 232, 38, 7, 3, 1],
    provenance: "automobile insurance claim counts, 4000 policies (Willmot)",
};

pub const CAR_CN: EmbeddedDataset = EmbeddedDataset {
    name: "car_cn",
    counts: &[27141, 5789, 1443, 457, 155, 56, 27, 2, 1, 1],
    provenance: "car insurance claim counts, 35072 policies",
};

pub const SIM_NB: EmbeddedDataset = EmbeddedDataset {
    name: "sim_nb",
    counts: &[5060, 2480, 1199, 638, 318, 165, 74, 33, 20, 8, 4, 1],
    provenance: "10000 inverse-transform draws from NB(1, 0.5)",
};

pub const SIM_CMNB: EmbeddedDataset = EmbeddedDataset {
    name: "sim_cmnb",
    counts: &[6442, 1866, 874, 435, 188, 101, 55, 19, 7, 8, 2, 2, 1],
    provenance: "10000 inverse-transform draws from CMNB(0.005, 0.1, 0.5)",
};

pub const ALL: [EmbeddedDataset; 4] = [WILLMOT, CAR_CN, SIM_NB, SIM_CMNB];

pub fn by_name(name: &str) -> Option<EmbeddedDataset> {
    ALL.iter().copied().find(|d| d.name == name)
}
