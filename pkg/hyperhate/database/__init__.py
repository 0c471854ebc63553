"""
Database package for hyperhate.
Contains the SQLite schema of the experiment result store.
"""

from hyperhate.database.schema import SCHEMA_VERSION, SCHEMA_SQL
