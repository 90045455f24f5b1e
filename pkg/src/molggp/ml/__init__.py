"""Scalers, univariate selectors and tree classifiers for pipeline evaluation."""
