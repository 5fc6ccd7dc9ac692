//! Command-line front end for the network stability toolkit: text specs for
//! graphs and nodes, SVG chart emission, and the built-in experiment runs.

pub mod experiments;
pub mod specs;
pub mod svg;
