#ifndef DIAMOND_H
#define DIAMOND_H

class A
{
};

class B : public A
{
};

class C : public B, public A
{
};

#endif
