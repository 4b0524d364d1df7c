#ifndef CLEAN_LIB_H
#define CLEAN_LIB_H

#include <ext.h>

class B : public E1
{
};

class C
{
};

void f(E2 e);

E3 g();

class D
{
};

#endif
