//! Acceptance suite: the numbered criteria on the ex1 fixtures, the
//! binary's exit codes and outputs, and the file formats. One target, so a
//! failing criterion does not stop the remaining checks from running.

mod cli;
mod criteria;
mod formats;
