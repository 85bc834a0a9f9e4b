"""careerkit: career-field prediction from student skill surveys.

A numpy library covering the full pipeline: survey ingestion and cleaning,
bag-of-words preprocessing, eight from-scratch classifiers (decision tree,
linear SVM, logistic regression, KNN, multinomial naive Bayes, MLP, CNN,
LSTM), a complete evaluation suite, and an operational shell (CLI + HTTP
service) that serves probability-ranked career predictions.
"""

__version__ = "0.1.0"
