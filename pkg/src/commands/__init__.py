"""
Command Table
Which subcommand owns each check
"""

# Each check operation is owned by exactly one subcommand
COMMAND_CHECKS = {
    'data split': ('assign_splits',),
    'data profile': ('class_distribution', 'duplicate_census', 'check_duplicate_labels'),
    'metrics classify': ('confusion_matrix', 'classification_report', 'per_label_report',
                         'roc_curve', 'auc', 'average_precision', 'top_k_accuracy'),
    'metrics regress': ('regression_report', 'mean_loss'),
    'metrics overlap': ('iou', 'dice'),
    'check splits': ('check_split_disjoint',),
    'check folds': ('check_fold_disjoint',),
    'check clusters': ('check_cluster_fold_assignment',),
    'check label-leak': ('check_label_leakage',),
    'check metric-fit': ('check_metric_appropriateness', 'baseline_majority_performance'),
    'diagnose overfit': ('overfit_gap',),
    'diagnose sweep': ('capacity_sweep_analysis',),
    'diagnose loss': ('check_loss_task_consistency',),
    'diagnose prob-outputs': ('validate_probability_outputs',),
    'diagnose min-perf': ('check_min_performance',),
    'catalog evaluate': ('evaluate_assessment',),
    'catalog cl': ('determine_cl', 'applicable_requirements'),
    'case init': ('new_case',),
    'case advance': ('advance',),
    'case status': ('certificate_status',),
    'report render': ('render_report',),
}


def check_owners():
    """Map every check to the subcommands that list it"""
    owners = {}
    for command, checks in COMMAND_CHECKS.items():
        for check in checks:
            owners.setdefault(check, []).append(command)
    return owners
