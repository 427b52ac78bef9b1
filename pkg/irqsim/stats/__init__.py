from irqsim.stats.summary import StreamingSummary, build_report, hard_limit, histogram, summarize
from irqsim.stats.export import (
    format_cell, histogram_csv, plot_data, render_table, report_json, samples_csv, trace_csv
)

__all__ = [
    'StreamingSummary', 'build_report', 'hard_limit', 'histogram', 'summarize',
    'format_cell', 'histogram_csv', 'plot_data', 'render_table', 'report_json', 'samples_csv', 'trace_csv',
]
