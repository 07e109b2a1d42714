/// Position strings shared by several test modules.
pub(crate) const KNOWN_POSITIONS: &[&str] = &[
    "0.0.}]!",
    "0.0.0.}]!",
    "0.AB.}AB.}]!",
    "AB.}0.AB.}]!",
    "AB.}AB.}]!",
    "BA.}BA.}]!",
    "ABCD.}AB.}CD.}]!",
    "0.0.AB.}AB.}]!",
    "ABCD.}ABEF.}CDFE.}]!",
    "0.0.A.}1A.}]!",
    "1ABC.}BCDE.}ADE.}]!",
    "0.0.0.0.0.0.0.0.}]22.}]2ab2ba.}]0.0.A.}2A.}]!",
    "0.0.0.0.0.0.0.0.}]!",
    "22.}]!",
    "2ab2ba.}]!",
    "0.0.A.}2A.}]!",
    "1abcde2edcba.2.}]!",
    "0.0.0.0.0.0.0.0.AB.}0.0.0.AB.}]!",
    "0.0.0.0.0.0.0.0.}]0.0.A.}0.A.}]!",
    "0.0.A.}0.A.}]!",
    "0.0.0.0.0.}]0.0.0.0.}]!",
    "0.0.0.0.2.}]!",
    "ABC.}ABD.}CE.}DE.}]!",
];
