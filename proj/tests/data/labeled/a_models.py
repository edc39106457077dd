import numpy as np
from sklearn.svm import SVC
from sklearn.linear_model import LogisticRegression
from sklearn.ensemble import RandomForestClassifier

X = np.zeros((10, 2))
y = np.zeros(10)

clf1 = SVC()
clf2 = SVC(gamma='auto')
clf3 = SVC(kernel='linear', C=0.5)
clf5 = SVC(1.0)
lr1 = LogisticRegression()
lr2 = LogisticRegression('l1', solver='liblinear')
lr3 = LogisticRegression('l2')
lr4 = LogisticRegression(penalty='none', max_iter=500)
lr5 = LogisticRegression(solver=
                         'saga')
rf1 = RandomForestClassifier()
rf2 = RandomForestClassifier(200)
rf4 = RandomForestClassifier(max_depth=3)
params = {'gamma': 'scale'}
clf6 = SVC(**params)
