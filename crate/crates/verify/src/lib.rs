//! Holds the acceptance test target; it lives in its own package so that a
//! red criterion does not stop the rest of the workspace suite.
