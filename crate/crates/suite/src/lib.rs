//! Holds the `acceptance` test target, which checks every acceptance criterion against
//! independent test-side oracles and prints one line per criterion.
