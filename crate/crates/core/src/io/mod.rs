//! File formats: run configuration, VTK legacy output and CSV time series.

mod config;
mod csv;
mod vtk;

pub use config::{
    parse_config, parse_temperature_file, BoundarySpec, FluxForm, FluxOptions, Mode, NetworkSource, OutputKind,
    OutputSpec, PhenotypeOptions, RunConfig, Temperature,
};
pub use csv::{csv_string, parse_csv_timeseries, write_csv_timeseries, TimeSeries};
pub use vtk::{validate_vtk, vtk_string, write_vtk, VtkField, VtkSummary, VTK_HEADER};
