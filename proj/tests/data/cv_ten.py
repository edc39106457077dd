from sklearn import model_selection
from sklearn.model_selection import cross_val_score, KFold
from sklearn.tree import DecisionTreeClassifier

tree = DecisionTreeClassifier(max_depth=3)
folds = KFold(n_splits=4)
a = cross_val_score(tree, X, y)
b = cross_val_score(tree, X, y, cv=5)
c = cross_val_score(tree, X, y, cv=folds)
d = model_selection.cross_val_score(tree, X, y)
e = cross_val_score(tree, X, y, scoring='f1', cv=3)
f = cross_val_score(estimator=tree, X=X, y=y)
g = cross_val_score(tree, X, y, cv=folds, n_jobs=2)
h = cross_val_score(tree, X, y, n_jobs=-1)
i = model_selection.cross_val_score(tree, X, y, cv=KFold(3))
j = cross_val_score(tree, X, cv=10, y=y)
