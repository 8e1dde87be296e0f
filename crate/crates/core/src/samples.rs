//! The bundled automata, embedded from the repository `corpus/` directory so
//! that the files and the in-crate copies cannot drift apart.

use crate::automaton::Automaton;

pub const GRIGORCHUK: &str = include_str!("../../../corpus/grigorchuk.ssg");
pub const GRIGORCHUK_ERSCHLER: &str = include_str!("../../../corpus/grigorchuk_erschler.ssg");
pub const GUPTA_SIDKI_3: &str = include_str!("../../../corpus/gupta_sidki3.ssg");
pub const ODOMETER: &str = include_str!("../../../corpus/odometer.ssg");
pub const MULTISPINAL_4: &str = include_str!("../../../corpus/multispinal4.ssg");

pub fn grigorchuk() -> Automaton {
    Automaton::parse(GRIGORCHUK).expect("bundled automaton parses")
}

pub fn grigorchuk_erschler() -> Automaton {
    Automaton::parse(GRIGORCHUK_ERSCHLER).expect("bundled automaton parses")
}

pub fn gupta_sidki3() -> Automaton {
    Automaton::parse(GUPTA_SIDKI_3).expect("bundled automaton parses")
}

pub fn odometer() -> Automaton {
    Automaton::parse(ODOMETER).expect("bundled automaton parses")
}

pub fn multispinal4() -> Automaton {
    Automaton::parse(MULTISPINAL_4).expect("bundled automaton parses")
}
