#![allow(dead_code)]

pub mod corrupt;
pub mod oracle;

use ltlbridge::ltl::AtomName;

pub fn atoms(names: &[&str]) -> Vec<AtomName> {
    names.iter().map(|a| AtomName::new(*a).unwrap()).collect()
}
