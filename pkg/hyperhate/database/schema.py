"""
Schema definitions for the experiment result SQLite database.
"""

# Current schema version, increment this when schema changes
SCHEMA_VERSION = 1

# SQLite schema definition
SCHEMA_SQL = """
-- Schema Version Tracking
CREATE TABLE IF NOT EXISTS schema_info (
    version INTEGER PRIMARY KEY,
    applied_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
);

-- One row per experiment invocation
CREATE TABLE IF NOT EXISTS experiments (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    source TEXT NOT NULL,
    target TEXT NOT NULL,
    created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP,
    spec TEXT DEFAULT '{}'             -- JSON of the ExperimentSpec
);

-- Grid cell results
CREATE TABLE IF NOT EXISTS results (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    experiment_id INTEGER NOT NULL,
    model TEXT NOT NULL,
    source TEXT NOT NULL,
    target TEXT NOT NULL,
    n INTEGER NOT NULL,
    seed INTEGER NOT NULL,
    precision REAL NOT NULL,
    recall REAL NOT NULL,
    f1 REAL NOT NULL,
    tp INTEGER NOT NULL,
    fp INTEGER NOT NULL,
    fn INTEGER NOT NULL,
    tn INTEGER NOT NULL,
    FOREIGN KEY (experiment_id) REFERENCES experiments(id) ON DELETE CASCADE
);

CREATE INDEX IF NOT EXISTS idx_results_experiment ON results(experiment_id);
CREATE UNIQUE INDEX IF NOT EXISTS idx_results_cell ON results(experiment_id, model, source, target, n, seed);
"""
