//! Models and expanded forms shared by the criterion benches.

use wfts_core::io::generators::Generator;
use wfts_core::Wfts;

/// `taxi:1..=max_licenses` followed by the mine pump, each with unit
/// lengths so the benches time analysis alone.
pub fn cases(max_licenses: u32) -> Vec<(String, Wfts)> {
    (1..=max_licenses)
        .map(Generator::Taxi)
        .chain([Generator::MinepumpLite])
        .map(|g| (g.to_string(), g.build().expand_lengths()))
        .collect()
}
