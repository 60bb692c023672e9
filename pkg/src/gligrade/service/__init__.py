"""Deployable service: append-only journal persistence, HTTP facade with
bearer-token roles, and the admin command line."""
