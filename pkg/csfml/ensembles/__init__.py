from csfml.ensembles.cart import DecisionTree, TreeConfig, fit_cart
from csfml.ensembles.boosting import TreeEnsemble, adaboost_fit, ensemble_score, rusboost_fit
from csfml.ensembles.bagging import bagging_fit
